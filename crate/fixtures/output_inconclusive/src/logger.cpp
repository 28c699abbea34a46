void Java_Logger_log(JNIEnv *env, jobject self, jstring msg) {
    const char *text = env->GetStringUTFChars(msg, 0);
    printf(text);
}
