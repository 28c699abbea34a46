void Java_Reader_feed(JNIEnv *env, jobject self, jbyteArray data) {
    jbyte *raw = env->GetByteArrayElements(data, 0);
    char line[32];
    int n = raw[0];
    line[n] = 0;
}
