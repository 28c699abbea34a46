void Java_net_io_Net_send(JNIEnv *env, jobject self, jstring payload) {
    const char *text = env->GetStringUTFChars(payload, 0);
    stage(text);
}
