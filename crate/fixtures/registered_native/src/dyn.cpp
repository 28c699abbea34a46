static void nativePush(JNIEnv *env, jobject self, jbyteArray data) {
    jbyte *p = env->GetByteArrayElements(data, 0);
    char out[8];
    memmove(out, p, 32);
}
